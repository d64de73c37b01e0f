package org.good;

public class Decoys {
    public void run(String algo) throws Exception {
        MyCipher c1 = MyCipher.getInstance("AES");
        Cipher2 c2 = Cipher2.getInstance("DES");
        String s = "MessageDigest.getInstance(\"MD5\")";
        String t = "new SecureRandom()";
    }
}

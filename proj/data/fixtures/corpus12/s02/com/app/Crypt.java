package com.app;

import javax.crypto.Cipher;

public class Crypt {
    /* block comment decoy: Cipher.getInstance("DESede") */
    private static final String DECOY = "Cipher.getInstance(\"RC4\")";

    public void run(String algo) throws Exception {
        Cipher c1 = Cipher.getInstance("AES");
        Cipher c2 = Cipher.getInstance("AES/CBC/PKCS5Padding");
        Cipher c3 = Cipher.getInstance("DES");
        Cipher c4 = Cipher.getInstance(algo);
        Cipher c5 = Cipher.getInstance("A" + "ES");
        Cipher c6 = Cipher.getInstance("FOO");
    }
}

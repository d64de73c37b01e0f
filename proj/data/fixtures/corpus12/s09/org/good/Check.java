package org.good;

import java.security.MessageDigest;

public class Check {
    public byte[] sum(byte[] d, String name) throws Exception {
        MessageDigest a = MessageDigest.getInstance("md5");
        MessageDigest b = MessageDigest.getInstance("MD5");
        MessageDigest c = MessageDigest.getInstance("SHA-256");
        MessageDigest d2 = MessageDigest.getInstance(name);
        return d2.digest(c.digest(b.digest(a.digest(d))));
    }
}

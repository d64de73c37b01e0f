package com.app;

import java.security.MessageDigest;

public class Hasher {
    // MessageDigest.getInstance("SHA-512") in a comment must not count
    public byte[] one(byte[] data) throws Exception {
        MessageDigest md = MessageDigest.getInstance("MD5");
        return md.digest(data);
    }

    public byte[] two(byte[] data, String algo) throws Exception {
        MessageDigest a = MessageDigest.getInstance("MD5");
        MessageDigest b = MessageDigest.getInstance("SHA-256");
        MessageDigest c = MessageDigest.getInstance(algo);
        return c.digest(a.digest(b.digest(data)));
    }
}

package com.app;

import java.security.SecureRandom;

public class Rand {
    public void seed() throws Exception {
        SecureRandom r1 = SecureRandom.getInstance("SHA1PRNG");
        SecureRandom r2 = SecureRandom.getInstance("SHA1PRNG");
        SecureRandom r3 = new SecureRandom();
        System.loadLibrary("libopenssl-wrap");
        Loader.loadLibrary("wolfssl");
    }
}

package com.app;

public class Quiet {
    /*
     * KeyAgreement.getInstance("DH")
     * System.loadLibrary("openssl")
     */
    public void noop() {
        // Cipher.getInstance("AES")
    }
}

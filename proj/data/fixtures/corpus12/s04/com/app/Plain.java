package com.app;

public class Plain {
    // decoy only: Mac.getInstance("HmacSHA1")
    private static final String NOTE = "Signature.getInstance(\"SHA1withRSA\")";

    public int add(int a, int b) {
        return a + b;
    }
}

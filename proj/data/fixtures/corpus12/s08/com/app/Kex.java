package com.app;

import javax.crypto.KeyAgreement;
import javax.crypto.Cipher;

public class Kex {
    public void agree() throws Exception {
        KeyAgreement k1 = KeyAgreement.getInstance("DH"); KeyAgreement k2 = KeyAgreement.getInstance("ECDH");
        Cipher c1 = Cipher.getInstance("Blowfish/CBC/NoPadding");
        Cipher c2 = Cipher.getInstance("RSA");
        Cipher c3 = Cipher.getInstance("RSA/ECB/NoPadding");
    }
}

package com.app;

import java.security.Signature;
import java.security.KeyFactory;

public class Signer {
    public void sign(String algo) throws Exception {
        Signature s1 = Signature.getInstance("SHA1withRSA");
        Signature s2 = Signature.getInstance("SHA256withECDSA");
        Signature s3 = Signature.getInstance(algo);
        KeyFactory kf = KeyFactory.getInstance("X509");
    }
}

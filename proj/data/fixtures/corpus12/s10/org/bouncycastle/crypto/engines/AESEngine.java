package org.bouncycastle.crypto.engines;

import javax.crypto.Cipher;

public class AESEngine {
    public void x() throws Exception {
        Cipher c = Cipher.getInstance("AES/GCM/NoPadding");
    }
}

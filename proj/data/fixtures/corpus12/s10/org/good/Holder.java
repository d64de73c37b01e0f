package org.good;

import javax.crypto.Cipher;

public class Holder {
    private Cipher cached;
}

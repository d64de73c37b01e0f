package org.good;

import javax.crypto.*;

public class Auth {
    public void setup() throws Exception {
        Mac m1 = Mac.getInstance("HmacSHA1");
        Mac m2 = Mac.getInstance("HmacSHA256");
        KeyGenerator kg1 = KeyGenerator.getInstance("AES");
        KeyGenerator kg2 = KeyGenerator.getInstance("FOO");
    }
}

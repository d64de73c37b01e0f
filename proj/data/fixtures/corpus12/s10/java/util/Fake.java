package java.util;

import java.security.MessageDigest;

public class Fake {
    public void h() throws Exception {
        MessageDigest md = MessageDigest.getInstance("MD5");
    }
}

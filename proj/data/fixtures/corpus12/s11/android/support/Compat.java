package android.support;

import javax.crypto.Mac;

public class Compat {
    public void m() throws Exception {
        Mac mac = Mac.getInstance("HmacSHA1");
    }
}

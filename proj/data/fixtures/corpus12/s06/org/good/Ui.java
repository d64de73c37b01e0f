package org.good;

public class Ui {
    public void render() {
        Object w = android.widget.Api.call(0);
        Object v = android.view.Api.call(1);
    }
}

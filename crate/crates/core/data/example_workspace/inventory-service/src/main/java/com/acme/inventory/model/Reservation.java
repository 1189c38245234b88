package com.acme.inventory.model;

import java.time.Duration;
import java.time.Instant;

// A time-limited hold of stock for an order.
public record Reservation(String orderId, String sku, int quantity, String warehouseCode, Instant expiresAt) {
    public static Reservation hold(String orderId, String sku, int quantity, String warehouseCode, Duration holdFor) {
        return new Reservation(orderId, sku, quantity, warehouseCode, Instant.now().plus(holdFor));
    }
}

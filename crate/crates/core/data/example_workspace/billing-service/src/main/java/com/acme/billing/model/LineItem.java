package com.acme.billing.model;

// One invoice line: product, quantity and unit price.
public record LineItem(String productSku, int quantity, long unitPriceCents) {
    public long lineTotalCents() {
        return quantity * unitPriceCents;
    }
}

package com.acme.inventory.model;

// Stock of one SKU in one warehouse, split into on-hand and held quantities.
public class StockLevel {
    private final String sku;
    private final String warehouseCode;
    private int onHandQuantity;
    private int heldQuantity;
    private int reorderPoint;
    private int safetyStock;
    private int dailyDemand;

    public int availableQuantity() {
        return onHandQuantity - heldQuantity;
    }

    public void holdQuantity(int quantity) {
        heldQuantity += quantity;
    }

    public void releaseQuantity(int quantity) {
        heldQuantity -= quantity;
    }
}

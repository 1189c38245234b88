package com.acme.inventory.api;

import com.acme.inventory.model.Reservation;
import com.acme.inventory.service.ReservationService;
import com.acme.inventory.persistence.StockLevelRepository;
import com.acme.inventory.validation.SkuFormatValidator;

// REST endpoints for stock queries and reservations.
public class StockController {
    private final StockLevelRepository stockLevels;
    private final ReservationService reservationService;
    private final SkuFormatValidator skuValidator;

    public StockController(StockLevelRepository stockLevels, ReservationService reservationService, SkuFormatValidator skuValidator) {
        this.stockLevels = stockLevels;
        this.reservationService = reservationService;
        this.skuValidator = skuValidator;
    }

    public int getAvailableQuantity(String sku, String warehouseCode) {
        skuValidator.requireValidSku(sku);
        return stockLevels.findStockLevel(sku, warehouseCode).availableQuantity();
    }

    public Reservation postReservation(String orderId, String sku, int quantity) {
        skuValidator.requireValidSku(sku);
        return reservationService.reserveStock(orderId, sku, quantity);
    }
}

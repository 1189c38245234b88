package com.acme.inventory.service;

import com.acme.inventory.events.StockEventPublisher;
import com.acme.inventory.model.Reservation;
import com.acme.inventory.model.StockLevel;
import com.acme.inventory.persistence.StockLevelRepository;
import java.time.Duration;

// Reserves stock for orders and releases expired reservations.
public class ReservationService {
    private static final Duration RESERVATION_HOLD = Duration.ofMinutes(30);
    private final StockLevelRepository stockLevels;
    private final StockEventPublisher stockEvents;

    public ReservationService(StockLevelRepository stockLevels, StockEventPublisher stockEvents) {
        this.stockLevels = stockLevels;
        this.stockEvents = stockEvents;
    }

    public Reservation reserveStock(String orderId, String sku, int quantity) {
        StockLevel stockLevel = stockLevels.findBestWarehouseFor(sku, quantity);
        if (stockLevel.availableQuantity() < quantity) {
            throw new InsufficientStockException(sku, quantity);
        }
        stockLevel.holdQuantity(quantity);
        stockLevels.saveStockLevel(stockLevel);
        Reservation reservation = Reservation.hold(orderId, sku, quantity, stockLevel.warehouseCode(), RESERVATION_HOLD);
        stockEvents.publishStockReserved(reservation);
        return reservation;
    }

    public void releaseExpiredReservations(java.time.Instant now) {
        for (Reservation reservation : stockLevels.findExpiredReservations(now)) {
            StockLevel stockLevel = stockLevels.findStockLevel(reservation.sku(), reservation.warehouseCode());
            stockLevel.releaseQuantity(reservation.quantity());
            stockLevels.saveStockLevel(stockLevel);
            stockEvents.publishReservationExpired(reservation);
        }
    }
}

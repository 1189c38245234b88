package com.acme.inventory.events;

import com.acme.inventory.model.Reservation;

// Publishes stock reservation events to the message broker.
public class StockEventPublisher {
    private final BrokerClient brokerClient;

    public StockEventPublisher(BrokerClient brokerClient) {
        this.brokerClient = brokerClient;
    }

    public void publishStockReserved(Reservation reservation) {
        brokerClient.send("inventory.stock-reserved", reservation.orderId(), reservation);
    }

    public void publishReservationExpired(Reservation reservation) {
        brokerClient.send("inventory.reservation-expired", reservation.orderId(), reservation);
    }
}

package com.acme.customer.events;

import com.acme.customer.service.LoyaltyPointsService;

// Consumes order events and awards loyalty points for paid orders.
public class CustomerEventListener {
    private final LoyaltyPointsService loyaltyPoints;

    public CustomerEventListener(LoyaltyPointsService loyaltyPoints) {
        this.loyaltyPoints = loyaltyPoints;
    }

    public void onOrderPaid(OrderPaidEvent orderPaidEvent) {
        loyaltyPoints.awardPoints(orderPaidEvent.customerId(), orderPaidEvent.orderTotalCents());
    }
}

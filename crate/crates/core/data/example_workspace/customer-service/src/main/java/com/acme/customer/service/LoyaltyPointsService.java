package com.acme.customer.service;

import com.acme.customer.model.LoyaltyTier;
import com.acme.customer.persistence.CustomerRepository;

// Loyalty points ledger and tier thresholds.
public class LoyaltyPointsService {
    static final int SILVER_THRESHOLD_POINTS = 1000;
    static final int GOLD_THRESHOLD_POINTS = 5000;
    private final CustomerRepository customers;

    public LoyaltyPointsService(CustomerRepository customers) {
        this.customers = customers;
    }

    public void awardPoints(String customerId, long orderTotalCents) {
        long earnedPoints = orderTotalCents / 100;
        customers.addLoyaltyPoints(customerId, earnedPoints);
    }

    public LoyaltyTier loyaltyTier(String customerId) {
        long loyaltyPoints = customers.loyaltyPointsOf(customerId);
        if (loyaltyPoints > GOLD_THRESHOLD_POINTS) {
            return LoyaltyTier.GOLD;
        }
        if (loyaltyPoints > SILVER_THRESHOLD_POINTS) {
            return LoyaltyTier.SILVER;
        }
        return LoyaltyTier.BRONZE;
    }
}

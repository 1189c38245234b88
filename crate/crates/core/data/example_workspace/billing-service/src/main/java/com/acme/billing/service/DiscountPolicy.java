package com.acme.billing.service;

// Loyalty tier discounts applied to invoice subtotals.
public class DiscountPolicy {
    private final LoyaltyTierClient loyaltyTierClient;

    public DiscountPolicy(LoyaltyTierClient loyaltyTierClient) {
        this.loyaltyTierClient = loyaltyTierClient;
    }

    public long discountFor(String customerId, long subtotalCents) {
        String loyaltyTier = loyaltyTierClient.loyaltyTierOf(customerId);
        int discountPercent = switch (loyaltyTier) {
            case "GOLD" -> 10;
            case "SILVER" -> 5;
            default -> 0;
        };
        return subtotalCents * discountPercent / 100;
    }
}

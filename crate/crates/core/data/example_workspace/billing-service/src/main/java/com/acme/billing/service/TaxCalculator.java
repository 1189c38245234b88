package com.acme.billing.service;

import java.util.Map;

// Computes value-added tax for a region; rates are in basis points.
public class TaxCalculator {
    private static final Map<String, Integer> VAT_RATE_BASIS_POINTS = Map.of(
        "DE", 1900,
        "FR", 2000,
        "NL", 2100,
        "CH", 810
    );

    public long regionalTax(String region, long taxableCents) {
        int rateBasisPoints = VAT_RATE_BASIS_POINTS.getOrDefault(region, 0);
        return roundHalfUp(taxableCents * rateBasisPoints, 10_000);
    }

    static long roundHalfUp(long numerator, long denominator) {
        return (numerator + denominator / 2) / denominator;
    }
}

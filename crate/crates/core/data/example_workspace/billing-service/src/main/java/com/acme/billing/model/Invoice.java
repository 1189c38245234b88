package com.acme.billing.model;

import java.util.List;

// Invoice aggregate with its line items, totals and status.
public class Invoice {
    private final String id;
    private final String orderId;
    private final String customerId;
    private final List<LineItem> lines;
    private InvoiceStatus status = InvoiceStatus.DRAFT;
    private long subtotalCents;
    private long discountCents;
    private long taxCents;
    private String voidReason;

    public static Invoice draft(String orderId, String customerId, List<LineItem> lines) {
        return new Invoice(Ids.newInvoiceId(), orderId, customerId, lines);
    }

    public long subtotalCents() {
        return lines.stream().mapToLong(LineItem::lineTotalCents).sum();
    }

    public void applyTotals(long subtotalCents, long discountCents, long taxCents) {
        this.subtotalCents = subtotalCents;
        this.discountCents = discountCents;
        this.taxCents = taxCents;
    }

    public long totalCents() {
        return subtotalCents - discountCents + taxCents;
    }

    public void markPaid() {
        status = InvoiceStatus.PAID;
    }

    public void voidWithReason(String reason) {
        status = InvoiceStatus.VOID;
        voidReason = reason;
    }
}

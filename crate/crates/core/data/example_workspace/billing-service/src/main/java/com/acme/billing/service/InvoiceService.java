package com.acme.billing.service;

import com.acme.billing.model.Invoice;
import com.acme.billing.model.LineItem;
import com.acme.billing.persistence.InvoiceRepository;
import java.util.List;

// Invoice lifecycle: draft creation, totals, issuing, payment and voiding.
public class InvoiceService {
    private final InvoiceRepository invoiceRepository;
    private final TaxCalculator taxCalculator;
    private final DiscountPolicy discountPolicy;

    public InvoiceService(InvoiceRepository invoiceRepository, TaxCalculator taxCalculator, DiscountPolicy discountPolicy) {
        this.invoiceRepository = invoiceRepository;
        this.taxCalculator = taxCalculator;
        this.discountPolicy = discountPolicy;
    }

    public Invoice createInvoice(String orderId, String customerId, List<LineItem> lines) {
        Invoice invoice = Invoice.draft(orderId, customerId, lines);
        long subtotalCents = invoice.subtotalCents();
        long discountCents = discountPolicy.discountFor(customerId, subtotalCents);
        long taxCents = taxCalculator.regionalTax(invoice.region(), subtotalCents - discountCents);
        invoice.applyTotals(subtotalCents, discountCents, taxCents);
        return invoiceRepository.saveInvoice(invoice);
    }

    public Invoice findInvoice(String invoiceId) {
        return invoiceRepository.findInvoiceById(invoiceId);
    }

    public void markPaid(String invoiceId, long amountCents) {
        Invoice invoice = invoiceRepository.findInvoiceById(invoiceId);
        if (amountCents >= invoice.totalCents()) {
            invoice.markPaid();
            invoiceRepository.saveInvoice(invoice);
        }
    }

    public void voidInvoice(String invoiceId, String reason) {
        Invoice invoice = invoiceRepository.findInvoiceById(invoiceId);
        invoice.voidWithReason(reason);
        invoiceRepository.saveInvoice(invoice);
    }
}

package com.acme.billing.api;

import com.acme.billing.persistence.PaymentRecordRepository;
import com.acme.billing.service.InvoiceService;

// Receives payment provider webhooks and marks invoices as paid.
public class PaymentWebhookController {
    private final PaymentRecordRepository paymentRecords;
    private final InvoiceService invoiceService;

    public PaymentWebhookController(PaymentRecordRepository paymentRecords, InvoiceService invoiceService) {
        this.paymentRecords = paymentRecords;
        this.invoiceService = invoiceService;
    }

    public void onPaymentSucceeded(WebhookEvent webhookEvent) {
        if (paymentRecords.existsByProviderReference(webhookEvent.providerReference())) {
            return; // duplicate webhook delivery
        }
        paymentRecords.savePaymentRecord(webhookEvent.invoiceId(), webhookEvent.amountCents(), webhookEvent.providerReference());
        invoiceService.markPaid(webhookEvent.invoiceId(), webhookEvent.amountCents());
    }

    public void onPaymentRefunded(WebhookEvent webhookEvent) {
        paymentRecords.saveRefundRecord(webhookEvent.invoiceId(), webhookEvent.amountCents(), webhookEvent.providerReference());
    }
}

package com.acme.billing.persistence;

import java.sql.Connection;

// Stores payment and refund records received from the payment provider.
public class PaymentRecordRepository {
    private final Connection connection;

    public PaymentRecordRepository(Connection connection) {
        this.connection = connection;
    }

    public boolean existsByProviderReference(String providerReference) {
        return JdbcSupport.exists(connection, "SELECT 1 FROM payment_records WHERE provider_reference = ?", providerReference);
    }

    public void savePaymentRecord(String invoiceId, long amountCents, String providerReference) {
        JdbcSupport.execute(connection, "INSERT INTO payment_records VALUES (?, ?, ?, 'PAYMENT')", invoiceId, amountCents, providerReference);
    }

    public void saveRefundRecord(String invoiceId, long amountCents, String providerReference) {
        JdbcSupport.execute(connection, "INSERT INTO payment_records VALUES (?, ?, ?, 'REFUND')", invoiceId, amountCents, providerReference);
    }
}

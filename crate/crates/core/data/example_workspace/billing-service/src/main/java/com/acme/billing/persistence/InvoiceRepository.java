package com.acme.billing.persistence;

import com.acme.billing.model.Invoice;
import java.sql.Connection;

// JDBC access to the invoices table.
public class InvoiceRepository {
    private final Connection connection;

    public InvoiceRepository(Connection connection) {
        this.connection = connection;
    }

    public Invoice saveInvoice(Invoice invoice) {
        String upsertInvoiceSql = "INSERT INTO invoices (id, order_id, status, total_cents) VALUES (?, ?, ?, ?) "
            + "ON CONFLICT (id) DO UPDATE SET status = EXCLUDED.status, total_cents = EXCLUDED.total_cents";
        JdbcSupport.execute(connection, upsertInvoiceSql, invoice.id(), invoice.orderId(), invoice.status(), invoice.totalCents());
        return invoice;
    }

    public Invoice findInvoiceById(String invoiceId) {
        return JdbcSupport.queryOne(connection, "SELECT * FROM invoices WHERE id = ?", InvoiceRowMapper::map, invoiceId);
    }
}

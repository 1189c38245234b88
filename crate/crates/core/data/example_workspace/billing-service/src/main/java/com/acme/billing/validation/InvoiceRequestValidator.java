package com.acme.billing.validation;

import com.acme.billing.api.CreateInvoiceRequest;
import com.acme.billing.model.LineItem;

// Rejects malformed invoice creation requests before they reach the service layer.
public class InvoiceRequestValidator {
    public void validateCreateRequest(CreateInvoiceRequest request) {
        if (request.orderId() == null || request.orderId().isBlank()) {
            throw new ValidationException("orderId is required");
        }
        if (request.lines().isEmpty()) {
            throw new ValidationException("an invoice needs at least one line item");
        }
        for (LineItem line : request.lines()) {
            validateLineItem(line);
        }
    }

    void validateLineItem(LineItem line) {
        if (line.quantity() <= 0) {
            throw new ValidationException("line item quantity must be positive");
        }
        if (line.unitPriceCents() < 0) {
            throw new ValidationException("line item unit price must not be negative");
        }
    }
}

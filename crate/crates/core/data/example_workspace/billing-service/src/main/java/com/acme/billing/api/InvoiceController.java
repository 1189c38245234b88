package com.acme.billing.api;

import com.acme.billing.model.Invoice;
import com.acme.billing.service.InvoiceService;
import com.acme.billing.validation.InvoiceRequestValidator;

// REST endpoints for creating, fetching and voiding invoices.
public class InvoiceController {
    private final InvoiceService invoiceService;
    private final InvoiceRequestValidator requestValidator;

    public InvoiceController(InvoiceService invoiceService, InvoiceRequestValidator requestValidator) {
        this.invoiceService = invoiceService;
        this.requestValidator = requestValidator;
    }

    public Invoice postInvoice(CreateInvoiceRequest request) {
        requestValidator.validateCreateRequest(request);
        return invoiceService.createInvoice(request.orderId(), request.customerId(), request.lines());
    }

    public Invoice getInvoice(String invoiceId) {
        return invoiceService.findInvoice(invoiceId);
    }

    public void voidInvoice(String invoiceId, String reason) {
        invoiceService.voidInvoice(invoiceId, reason);
    }
}

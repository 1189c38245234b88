package com.acme.customer.model;

// Customer profile with contact details and addresses.
public class Customer {
    private final String id;
    private String displayName;
    private String emailAddress;
    private String phoneNumber;
    private Address billingAddress;
    private Address shippingAddress;

    public void changeEmail(String emailAddress) {
        this.emailAddress = emailAddress;
    }

    public void changePhone(String phoneNumber) {
        this.phoneNumber = phoneNumber;
    }

    public Address billingAddress() {
        return billingAddress;
    }
}

package com.acme.customer.model;

// Postal address of a customer.
public record Address(String street, String postalCode, String city, String countryCode) {
}

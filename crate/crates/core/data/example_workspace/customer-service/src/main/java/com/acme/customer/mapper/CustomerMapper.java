package com.acme.customer.mapper;

import com.acme.customer.api.CustomerDto;
import com.acme.customer.model.Address;
import com.acme.customer.model.Customer;

// Maps customer entities to API transfer objects.
public class CustomerMapper {
    public CustomerDto toDto(Customer customer) {
        Address billingAddress = customer.billingAddress();
        return new CustomerDto(
            customer.id(),
            customer.displayName(),
            customer.emailAddress(),
            formatPostalAddress(billingAddress));
    }

    String formatPostalAddress(Address address) {
        return address.street() + ", " + address.postalCode() + " " + address.city();
    }
}

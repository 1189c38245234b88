package com.acme.customer.service;

import com.acme.customer.events.CustomerEventListener;
import com.acme.customer.model.Customer;
import com.acme.customer.persistence.CustomerRepository;
import com.acme.customer.validation.EmailAddressValidator;
import com.acme.customer.validation.PhoneNumberValidator;

// Loads and updates customer profiles and contact details.
public class ProfileService {
    private final CustomerRepository customers;
    private final EmailAddressValidator emailValidator;
    private final PhoneNumberValidator phoneValidator;

    public ProfileService(CustomerRepository customers, EmailAddressValidator emailValidator, PhoneNumberValidator phoneValidator) {
        this.customers = customers;
        this.emailValidator = emailValidator;
        this.phoneValidator = phoneValidator;
    }

    public Customer loadProfile(String customerId) {
        return customers.findCustomerById(customerId);
    }

    public void changeEmail(String customerId, String emailAddress) {
        emailValidator.requireValidEmail(emailAddress);
        Customer customer = customers.findCustomerById(customerId);
        customer.changeEmail(emailAddress);
        customers.saveCustomer(customer);
    }

    public void changePhone(String customerId, String phoneNumber) {
        Customer customer = customers.findCustomerById(customerId);
        customer.changePhone(phoneValidator.normalizePhoneNumber(phoneNumber));
        customers.saveCustomer(customer);
    }
}

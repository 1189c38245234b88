package com.acme.customer.validation;

// Normalizes phone numbers to E.164 format.
public class PhoneNumberValidator {
    public String normalizePhoneNumber(String phoneNumber) {
        String digits = phoneNumber.replaceAll("[^0-9+]", "");
        if (digits.startsWith("00")) {
            digits = "+" + digits.substring(2);
        }
        if (!digits.startsWith("+") || digits.length() < 8) {
            throw new InvalidPhoneNumberException(phoneNumber);
        }
        return digits;
    }
}

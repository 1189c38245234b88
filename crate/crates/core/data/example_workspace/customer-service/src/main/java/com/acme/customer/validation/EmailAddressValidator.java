package com.acme.customer.validation;

import java.util.regex.Pattern;

// Validates email addresses before they are stored on a profile.
public class EmailAddressValidator {
    private static final Pattern EMAIL_PATTERN = Pattern.compile("^[a-z0-9._%+-]+@[a-z0-9.-]+\\.[a-z]{2,}$");

    public void requireValidEmail(String emailAddress) {
        if (emailAddress == null || !EMAIL_PATTERN.matcher(emailAddress).matches()) {
            throw new InvalidEmailException(emailAddress);
        }
    }
}

package com.acme.inventory.validation;

import java.util.regex.Pattern;

// Checks stock keeping unit codes such as ABC-12345.
public class SkuFormatValidator {
    private static final Pattern SKU_PATTERN = Pattern.compile("[A-Z]{3}-[0-9]{4}");

    public void requireValidSku(String sku) {
        if (sku == null || !SKU_PATTERN.matcher(sku).matches()) {
            throw new InvalidSkuException(sku);
        }
    }
}

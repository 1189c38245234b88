package com.acme.customer.api;

import com.acme.customer.mapper.CustomerMapper;
import com.acme.customer.service.LoyaltyPointsService;
import com.acme.customer.service.ProfileService;

// REST endpoints for customer profiles and loyalty tiers.
public class CustomerController {
    private final ProfileService profileService;
    private final LoyaltyPointsService loyaltyPoints;
    private final CustomerMapper customerMapper;

    public CustomerController(ProfileService profileService, LoyaltyPointsService loyaltyPoints, CustomerMapper customerMapper) {
        this.profileService = profileService;
        this.loyaltyPoints = loyaltyPoints;
        this.customerMapper = customerMapper;
    }

    public CustomerDto getCustomer(String customerId) {
        return customerMapper.toDto(profileService.loadProfile(customerId));
    }

    public void putEmail(String customerId, String emailAddress) {
        profileService.changeEmail(customerId, emailAddress);
    }

    public String getLoyaltyTier(String customerId) {
        return loyaltyPoints.loyaltyTier(customerId).name();
    }
}

package com.acme.customer.persistence;

import com.acme.customer.model.Customer;
import java.sql.Connection;

// JDBC access to customers, addresses and loyalty point balances.
public class CustomerRepository {
    private final Connection connection;

    public CustomerRepository(Connection connection) {
        this.connection = connection;
    }

    public Customer findCustomerById(String customerId) {
        return JdbcSupport.queryOne(connection, "SELECT * FROM customers WHERE id = ?", CustomerRowMapper::map, customerId);
    }

    public void saveCustomer(Customer customer) {
        JdbcSupport.execute(connection, "UPDATE customers SET email = ?, phone = ? WHERE id = ?",
            customer.emailAddress(), customer.phoneNumber(), customer.id());
    }

    public long loyaltyPointsOf(String customerId) {
        return JdbcSupport.queryLong(connection, "SELECT loyalty_points FROM customers WHERE id = ?", customerId);
    }

    public void addLoyaltyPoints(String customerId, long points) {
        JdbcSupport.execute(connection, "UPDATE customers SET loyalty_points = loyalty_points + ? WHERE id = ?", points, customerId);
    }
}

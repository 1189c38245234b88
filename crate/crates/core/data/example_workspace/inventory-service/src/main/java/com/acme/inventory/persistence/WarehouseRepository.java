package com.acme.inventory.persistence;

import java.sql.Connection;

// Warehouse master data: codes, regions and supplier lead times.
public class WarehouseRepository {
    private final Connection connection;

    public WarehouseRepository(Connection connection) {
        this.connection = connection;
    }

    public int leadTimeDays(String warehouseCode) {
        return JdbcSupport.queryInt(connection, "SELECT lead_time_days FROM warehouses WHERE code = ?", warehouseCode);
    }

    public String regionOf(String warehouseCode) {
        return JdbcSupport.queryString(connection, "SELECT region FROM warehouses WHERE code = ?", warehouseCode);
    }
}

package com.acme.inventory.persistence;

import com.acme.inventory.model.Reservation;
import com.acme.inventory.model.StockLevel;
import java.sql.Connection;
import java.time.Instant;
import java.util.List;

// JDBC access to stock levels and reservations.
public class StockLevelRepository {
    private final Connection connection;

    public StockLevelRepository(Connection connection) {
        this.connection = connection;
    }

    public StockLevel findStockLevel(String sku, String warehouseCode) {
        return JdbcSupport.queryOne(connection, "SELECT * FROM stock_levels WHERE sku = ? AND warehouse_code = ?", sku, warehouseCode);
    }

    public StockLevel findBestWarehouseFor(String sku, int quantity) {
        return JdbcSupport.queryOne(connection,
            "SELECT * FROM stock_levels WHERE sku = ? ORDER BY on_hand - held DESC LIMIT 1", sku);
    }

    public void saveStockLevel(StockLevel stockLevel) {
        JdbcSupport.execute(connection, "UPDATE stock_levels SET on_hand = ?, held = ? WHERE sku = ? AND warehouse_code = ?",
            stockLevel.onHandQuantity(), stockLevel.heldQuantity(), stockLevel.sku(), stockLevel.warehouseCode());
    }

    public List<Reservation> findExpiredReservations(Instant now) {
        return JdbcSupport.queryList(connection, "SELECT * FROM reservations WHERE expires_at < ?", now);
    }
}

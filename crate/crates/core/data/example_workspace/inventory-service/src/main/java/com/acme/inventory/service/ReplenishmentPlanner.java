package com.acme.inventory.service;

import com.acme.inventory.model.StockLevel;
import com.acme.inventory.persistence.WarehouseRepository;
import java.util.List;

// Plans purchase orders when stock drops below the reorder point.
public class ReplenishmentPlanner {
    private final WarehouseRepository warehouses;

    public ReplenishmentPlanner(WarehouseRepository warehouses) {
        this.warehouses = warehouses;
    }

    public List<PurchaseSuggestion> planReplenishment(List<StockLevel> stockLevels) {
        return stockLevels.stream()
            .filter(level -> level.onHandQuantity() < level.reorderPoint())
            .map(level -> new PurchaseSuggestion(level.sku(), level.warehouseCode(), reorderQuantity(level)))
            .toList();
    }

    int reorderQuantity(StockLevel level) {
        int leadTimeDays = warehouses.leadTimeDays(level.warehouseCode());
        return level.dailyDemand() * leadTimeDays + level.safetyStock() - level.onHandQuantity();
    }
}

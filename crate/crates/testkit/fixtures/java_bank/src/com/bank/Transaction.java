package com.bank;

import com.bank.util.Money;

public class Transaction {
    private final Account source;
    private final Account target;
    private final Money amount;

    public Transaction(Account source, Account target, Money amount) {
        this.source = source;
        this.target = target;
        this.amount = amount;
    }

    public boolean apply() {
        if (!source.withdraw(amount)) {
            return false;
        }
        target.deposit(amount);
        Audit.record(this);
        return true;
    }
}

package com.bank;

import com.bank.util.Money;

public class Account {
    private final String id;
    private Money balance;

    public Account(String id) {
        this.id = id;
        this.balance = Money.zero();
    }

    public String getId() {
        return id;
    }

    public Money getBalance() {
        return balance;
    }

    public void deposit(Money amount) {
        balance = balance.plus(amount);
    }

    public boolean withdraw(Money amount) {
        if (balance.lessThan(amount)) {
            return false;
        }
        balance = balance.minus(amount);
        return true;
    }
}

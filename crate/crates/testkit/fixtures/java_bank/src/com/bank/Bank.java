package com.bank;

import java.util.HashMap;
import java.util.Map;
import com.bank.util.Money;

public class Bank {
    private final Map<String, Account> accounts = new HashMap<>();
    private int opened;

    public Account open(String id) {
        Account account = new Account(id);
        accounts.put(id, account);
        opened++;
        return account;
    }

    public Account find(String id) {
        return accounts.get(id);
    }

    public boolean transfer(String from, String to, long cents) {
        Account a = find(from);
        Account b = find(to);
        Money amount = Money.of(cents);
        Transaction tx = new Transaction(a, b, amount);
        return tx.apply();
    }

    public int count() {
        int opened = accounts.size();
        return opened;
    }
}

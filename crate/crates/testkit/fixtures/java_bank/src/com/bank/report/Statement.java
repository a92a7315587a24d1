package com.bank.report;

import com.bank.Account;

public class Statement {
    private final StringBuilder lines = new StringBuilder();

    public void add(Account account) {
        lines.append(account.getId()).append(account.getBalance());
    }

    public String render() {
        return lines.toString();
    }
}

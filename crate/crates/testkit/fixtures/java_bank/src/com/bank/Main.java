package com.bank;

import com.bank.util.Money;
import com.bank.report.Statement;

public class Main {
    public static void main(String[] args) {
        Bank bank = new Bank();
        Account alice = bank.open("alice");
        bank.open("bob");
        alice.deposit(Money.of(1000));
        boolean ok = bank.transfer("alice", "bob", 250);
        System.out.println(ok + " " + alice.getBalance());
        Statement s = new Statement();
        Ledger.flush();
    }
}

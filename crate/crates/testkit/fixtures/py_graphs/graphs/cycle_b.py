from graphs.cycle_a import ping

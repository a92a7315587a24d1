from graphs.cycle_b import ping

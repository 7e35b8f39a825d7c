#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <utility>
#include <vector>

#include "finrel/errors.hpp"

namespace finrel {

// The schedule bijection from (even i, j) onto the even naturals with
// pairing(i, j) >= i. Pairs are enumerated along diagonals of i/2 + j with i
// ascending, and each pair takes the smallest unassigned even value >= i;
// values skipped that way stay in the pool for later pairs. The table grows
// on demand and is shared process-wide.

namespace detail {

struct PairingTable {
    std::mutex mutex;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> by_pair;
    std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> by_value;
    std::set<std::uint64_t> pool; // unassigned even values below next_fresh
    std::uint64_t next_fresh = 0; // smallest even value never pooled
    std::uint64_t next_diagonal = 0;

    static PairingTable& instance() {
        static PairingTable table;
        return table;
    }

    void grow_one_diagonal() {
        const std::uint64_t d = next_diagonal++;
        for (std::uint64_t half_i = 0; half_i <= d; ++half_i) {
            const std::uint64_t i = 2 * half_i;
            const std::uint64_t j = d - half_i;
            // smallest available even value >= i
            std::uint64_t value;
            auto it = pool.lower_bound(i);
            if (it != pool.end()) {
                value = *it;
                pool.erase(it);
            } else {
                while (next_fresh < i) {
                    pool.insert(next_fresh);
                    next_fresh += 2;
                }
                value = next_fresh;
                next_fresh += 2;
            }
            by_pair[{i, j}] = value;
            by_value[value] = {i, j};
        }
    }
};

} // namespace detail

inline std::uint64_t pairing(std::uint64_t i, std::uint64_t j) {
    if (i % 2 != 0) throw precondition_error("pairing: first argument must be even");
    auto& table = detail::PairingTable::instance();
    std::lock_guard<std::mutex> lock(table.mutex);
    const std::uint64_t horizon = 2'000'000;
    while (!table.by_pair.count({i, j})) {
        if (table.next_diagonal > horizon)
            throw resource_error("pairing table exceeded its horizon");
        table.grow_one_diagonal();
    }
    return table.by_pair[{i, j}];
}

inline std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t value) {
    if (value % 2 != 0) throw precondition_error("unpair: argument must be even");
    auto& table = detail::PairingTable::instance();
    std::lock_guard<std::mutex> lock(table.mutex);
    const std::uint64_t horizon = 2'000'000;
    while (!table.by_value.count(value)) {
        if (table.next_diagonal > horizon)
            throw resource_error("pairing table exceeded its horizon");
        table.grow_one_diagonal();
    }
    return table.by_value[value];
}

} // namespace finrel

#include "freerg/nc_calculus.hpp"

#include <algorithm>
#include <functional>

namespace freerg {

Int catalan(int n) {
    if (n < 0) throw input_error("catalan: n must be >= 0");
    std::vector<Int> c(static_cast<size_t>(n) + 1);
    c[0] = 1;
    for (int i = 1; i <= n; ++i) {
        Int s = 0;
        for (int j = 0; j < i; ++j) s += c[j] * c[i - 1 - j];
        c[i] = s;
    }
    return c[n];
}

namespace {

// The block of the least element of an interval splits the rest into
// independent sub-intervals; recurse on those. Emits each partition once.
void rec_intervals(const std::vector<std::pair<int, int>>& segments,
                   std::vector<std::vector<int>>& acc,
                   const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
    if (segments.empty()) {
        emit(acc);
        return;
    }
    auto [lo, hi] = segments.back();
    std::vector<std::pair<int, int>> rest(segments.begin(), segments.end() - 1);
    if (lo > hi) {
        rec_intervals(rest, acc, emit);
        return;
    }
    // choose the block of lo: lo plus any increasing subset of (lo, hi]
    std::vector<int> block{lo};
    std::function<void(int)> choose = [&](int next_min) {
        {
            // close the block here; the gap after the last member runs to hi
            auto segs = rest;
            int prev = lo;
            for (size_t i = 1; i < block.size(); ++i) {
                segs.push_back({prev + 1, block[i] - 1});
                prev = block[i];
            }
            segs.push_back({prev + 1, hi});
            acc.push_back(block);
            rec_intervals(segs, acc, emit);
            acc.pop_back();
        }
        for (int j = next_min; j <= hi; ++j) {
            block.push_back(j);
            choose(j + 1);
            block.pop_back();
        }
    };
    choose(lo + 1);
}

} // namespace

std::vector<SetPartition> enumerate_nc(int k) {
    if (k < 1) throw input_error("enumerate_nc: k must be >= 1");
    if (k > 14) throw input_error("enumerate_nc: k > 14 exceeds the size guard (Catalan growth)");
    std::vector<SetPartition> out;
    std::vector<std::vector<int>> acc;
    rec_intervals({{1, k}}, acc, [&](const std::vector<std::vector<int>>& blocks) {
        SetPartition p{blocks};
        std::sort(p.blocks.begin(), p.blocks.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        out.push_back(std::move(p));
    });
    return out;
}

bool is_noncrossing(const SetPartition& p) {
    const auto& bs = p.blocks;
    for (size_t i = 0; i < bs.size(); ++i) {
        for (size_t j = 0; j < bs.size(); ++j) {
            if (i == j) continue;
            // a<b<c<d with a,c in block i and b,d in block j?
            for (size_t ai = 0; ai + 1 < bs[i].size(); ++ai) {
                int a = bs[i][ai], c = bs[i][ai + 1];
                for (size_t bj = 0; bj + 1 < bs[j].size(); ++bj) {
                    int b = bs[j][bj], d = bs[j][bj + 1];
                    if (a < b && b < c && c < d) return false;
                }
            }
        }
    }
    return true;
}

std::vector<SetPartition> enumerate_all_partitions(int k) {
    if (k < 1) throw input_error("enumerate_all_partitions: k must be >= 1");
    if (k > 10) throw input_error("enumerate_all_partitions: k > 10 exceeds the size guard (Bell growth)");
    std::vector<SetPartition> out;
    std::vector<std::vector<int>> blocks;
    std::function<void(int)> place = [&](int e) {
        if (e > k) {
            out.push_back(SetPartition{blocks});
            return;
        }
        // index loop: recursion below grows `blocks` and can reallocate it
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            blocks[bi].push_back(e);
            place(e + 1);
            blocks[bi].pop_back();
        }
        blocks.push_back({e});
        place(e + 1);
        blocks.pop_back();
    };
    place(1);
    return out;
}

} // namespace freerg

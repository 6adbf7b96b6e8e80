#include <algorithm>
#include <bit>

#include "pyramid/nurse.hpp"

namespace pyramid::nurse {
namespace {

/// Schedule with incrementally maintained cumulative cover.
class Schedule {
public:
    Schedule(const NurseInstance& inst, std::span<const int> solution, double weight)
        : inst_(inst), weight_(weight), pattern_of_(solution.begin(), solution.end()) {
        for (int i = 0; i < inst.nurses(); ++i) {
            raw_ += inst.pref(i, pattern_of_[static_cast<std::size_t>(i)]);
            const Pattern pat = inst.patterns[static_cast<std::size_t>(pattern_of_[static_cast<std::size_t>(i)])];
            for (int k = 0; k < kSlots; ++k) {
                if (!covers(pat, k)) continue;
                for (int s = inst.grade_of[static_cast<std::size_t>(i)] - 1; s < inst.grades; ++s) ++at(s, k);
            }
        }
        for (int s = 0; s < inst.grades; ++s) {
            for (int k = 0; k < kSlots; ++k) violation_ += std::max(inst.demand(k, s) - at(s, k), 0);
        }
    }

    double penalized() const { return raw_ + weight_ * violation_; }
    int pattern(int nurse) const { return pattern_of_[static_cast<std::size_t>(nurse)]; }
    const std::vector<int>& solution() const { return pattern_of_; }

    void set(int nurse, int pattern) {
        const int old = pattern_of_[static_cast<std::size_t>(nurse)];
        if (old == pattern) return;
        raw_ += inst_.pref(nurse, pattern) - inst_.pref(nurse, old);
        const Pattern now = inst_.patterns[static_cast<std::size_t>(pattern)];
        unsigned diff = static_cast<unsigned>(inst_.patterns[static_cast<std::size_t>(old)] ^ now);
        while (diff) {
            const int k = std::countr_zero(diff);
            diff &= diff - 1;
            const int delta = covers(now, k) ? 1 : -1;
            for (int s = inst_.grade_of[static_cast<std::size_t>(nurse)] - 1; s < inst_.grades; ++s) {
                const int r = inst_.demand(k, s);
                int& c = at(s, k);
                violation_ -= std::max(r - c, 0);
                c += delta;
                violation_ += std::max(r - c, 0);
            }
        }
        pattern_of_[static_cast<std::size_t>(nurse)] = pattern;
    }

private:
    int& at(int s, int k) { return cover_[static_cast<std::size_t>(s * kSlots + k)]; }

    const NurseInstance& inst_;
    double weight_;
    std::vector<int> pattern_of_;
    std::array<int, kMaxGrades * kSlots> cover_{};
    double raw_ = 0.0;
    int violation_ = 0;
};

class Climber {
public:
    Climber(const NurseInstance& inst, std::span<const int> solution, double weight, int budget)
        : inst_(inst), schedule_(inst, solution, weight), budget_(budget) {
        allowed_.assign(static_cast<std::size_t>(inst.nurses()), std::vector<bool>(static_cast<std::size_t>(inst.pattern_count()), false));
        for (int i = 0; i < inst.nurses(); ++i) {
            for (int j : inst.feasible[static_cast<std::size_t>(i)]) allowed_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
    }

    HillclimbResult climb() {
        while (exhausted() == false && (singles() || swaps() || chains2() || chains3())) ++moves_;
        return {schedule_.solution(), moves_, evaluations_};
    }

private:
    bool exhausted() const { return evaluations_ >= budget_; }
    bool allowed(int nurse, int pattern) const {
        return allowed_[static_cast<std::size_t>(nurse)][static_cast<std::size_t>(pattern)];
    }

    /// Applies (nurse, pattern) changes in order; keeps them only on strict improvement.
    template <std::size_t N>
    bool attempt(const std::array<std::pair<int, int>, N>& changes) {
        ++evaluations_;
        const double before = schedule_.penalized();
        std::array<int, N> previous{};
        for (std::size_t c = 0; c < N; ++c) {
            previous[c] = schedule_.pattern(changes[c].first);
            schedule_.set(changes[c].first, changes[c].second);
        }
        if (schedule_.penalized() < before - 1e-9) return true;
        for (std::size_t c = N; c-- > 0;) schedule_.set(changes[c].first, previous[c]);
        return false;
    }

    bool singles() {
        for (int i = 0; i < inst_.nurses(); ++i) {
            for (int j : inst_.feasible[static_cast<std::size_t>(i)]) {
                if (exhausted()) return false;
                if (j != schedule_.pattern(i) && attempt(std::array{std::pair{i, j}})) return true;
            }
        }
        return false;
    }

    bool swaps() {
        for (int a = 0; a < inst_.nurses(); ++a) {
            for (int b = a + 1; b < inst_.nurses(); ++b) {
                if (exhausted()) return false;
                const int pa = schedule_.pattern(a), pb = schedule_.pattern(b);
                if (pa == pb || !allowed(a, pb) || !allowed(b, pa)) continue;
                if (attempt(std::array{std::pair{a, pb}, std::pair{b, pa}})) return true;
            }
        }
        return false;
    }

    // a takes b's pattern, b takes a fresh one.
    bool chains2() {
        for (int a = 0; a < inst_.nurses(); ++a) {
            for (int b = 0; b < inst_.nurses(); ++b) {
                const int pa = schedule_.pattern(a), pb = schedule_.pattern(b);
                if (a == b || pa == pb || !allowed(a, pb)) continue;
                for (int j : inst_.feasible[static_cast<std::size_t>(b)]) {
                    if (exhausted()) return false;
                    if (j == pb || j == pa) continue;
                    if (attempt(std::array{std::pair{a, pb}, std::pair{b, j}})) return true;
                }
            }
        }
        return false;
    }

    // a takes b's pattern, b takes c's, c takes a fresh one.
    bool chains3() {
        const int n = inst_.nurses();
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b || !allowed(a, schedule_.pattern(b)) || schedule_.pattern(a) == schedule_.pattern(b)) continue;
                for (int c = 0; c < n; ++c) {
                    const int pb = schedule_.pattern(b), pc = schedule_.pattern(c);
                    if (c == a || c == b || pb == pc || !allowed(b, pc)) continue;
                    for (int j : inst_.feasible[static_cast<std::size_t>(c)]) {
                        if (exhausted()) return false;
                        if (j == pc) continue;
                        if (attempt(std::array{std::pair{a, pb}, std::pair{b, pc}, std::pair{c, j}})) return true;
                    }
                }
            }
        }
        return false;
    }

    const NurseInstance& inst_;
    Schedule schedule_;
    std::vector<std::vector<bool>> allowed_;
    int budget_;
    int moves_ = 0;
    int evaluations_ = 0;
};

} // namespace

HillclimbResult hillclimb(const NurseInstance& instance, std::span<const int> solution, double weight, int move_budget) {
    if (static_cast<int>(solution.size()) != instance.nurses()) throw ContractViolation("solution length differs from nurse count");
    return Climber(instance, solution, weight, move_budget).climb();
}

} // namespace pyramid::nurse

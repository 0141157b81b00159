#pragma once

#include <string>
#include <string_view>

#include "hintgen/detail/text.hpp"

// Porter's 1980 suffix-stripping algorithm, original rule set. Used only to
// decide whether two tokens share a stem, so both sides always pass through
// the same code and the exact rule variant is not load-bearing.

namespace hintgen::detail {

class PorterStemmer {
public:
    // Expects a lowercase word; words of length <= 2 are left alone.
    std::string stem(std::string word) {
        if (word.size() <= 2)
            return word;
        b_ = std::move(word);
        k_ = static_cast<int>(b_.size()) - 1;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        b_.resize(static_cast<size_t>(k_) + 1);
        return std::move(b_);
    }

private:
    std::string b_;
    int k_ = 0; // last live index; the buffer may hold stale chars past it
    int j_ = 0;

    bool cons(int i) const {
        switch (b_[static_cast<size_t>(i)]) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return false;
        case 'y': return i == 0 ? true : !cons(i - 1);
        default: return true;
        }
    }

    // Number of vowel-consonant spans in b_[0..j_].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_)
                return n;
            if (!cons(i))
                break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_)
                    return n;
                if (cons(i))
                    break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_)
                    return n;
                if (!cons(i))
                    break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i))
                return true;
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1)
            return false;
        if (b_[static_cast<size_t>(i)] != b_[static_cast<size_t>(i) - 1])
            return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, last not w/x/y ("hop" yes,
    // "snow" no); gates restoring a final e.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2))
            return false;
        char ch = b_[static_cast<size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (len > k_ + 1)
            return false;
        if (b_.compare(static_cast<size_t>(k_ - len + 1), static_cast<size_t>(len), s) != 0)
            return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<size_t>(j_) + 1, static_cast<size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_stem(std::string_view s) {
        if (m() > 0)
            set_to(s);
    }

    void step1ab() {
        if (b_[static_cast<size_t>(k_)] == 's') {
            if (ends("sses"))
                k_ -= 2;
            else if (ends("ies"))
                set_to("i");
            else if (b_[static_cast<size_t>(k_) - 1] != 's')
                --k_;
        }
        if (ends("eed")) {
            if (m() > 0)
                --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (double_cons(k_)) {
                --k_;
                char ch = b_[static_cast<size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z')
                    ++k_;
            } else if (m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem())
            b_[static_cast<size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1)
            return;
        switch (b_[static_cast<size_t>(k_) - 1]) {
        case 'a':
            if (ends("ational")) { replace_if_stem("ate"); break; }
            if (ends("tional")) { replace_if_stem("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { replace_if_stem("ence"); break; }
            if (ends("anci")) { replace_if_stem("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { replace_if_stem("ize"); break; }
            break;
        case 'l':
            if (ends("abli")) { replace_if_stem("able"); break; }
            if (ends("alli")) { replace_if_stem("al"); break; }
            if (ends("entli")) { replace_if_stem("ent"); break; }
            if (ends("eli")) { replace_if_stem("e"); break; }
            if (ends("ousli")) { replace_if_stem("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { replace_if_stem("ize"); break; }
            if (ends("ation")) { replace_if_stem("ate"); break; }
            if (ends("ator")) { replace_if_stem("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { replace_if_stem("al"); break; }
            if (ends("iveness")) { replace_if_stem("ive"); break; }
            if (ends("fulness")) { replace_if_stem("ful"); break; }
            if (ends("ousness")) { replace_if_stem("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { replace_if_stem("al"); break; }
            if (ends("iviti")) { replace_if_stem("ive"); break; }
            if (ends("biliti")) { replace_if_stem("ble"); break; }
            break;
        default:
            break;
        }
    }

    void step3() {
        switch (b_[static_cast<size_t>(k_)]) {
        case 'e':
            if (ends("icate")) { replace_if_stem("ic"); break; }
            if (ends("ative")) { replace_if_stem(""); break; }
            if (ends("alize")) { replace_if_stem("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { replace_if_stem("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { replace_if_stem("ic"); break; }
            if (ends("ful")) { replace_if_stem(""); break; }
            break;
        case 's':
            if (ends("ness")) { replace_if_stem(""); break; }
            break;
        default:
            break;
        }
    }

    void step4() {
        if (k_ < 1)
            return;
        switch (b_[static_cast<size_t>(k_) - 1]) {
        case 'a':
            if (ends("al")) break;
            return;
        case 'c':
            if (ends("ance")) break;
            if (ends("ence")) break;
            return;
        case 'e':
            if (ends("er")) break;
            return;
        case 'i':
            if (ends("ic")) break;
            return;
        case 'l':
            if (ends("able")) break;
            if (ends("ible")) break;
            return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j_ >= 0 &&
                (b_[static_cast<size_t>(j_)] == 's' || b_[static_cast<size_t>(j_)] == 't'))
                break;
            if (ends("ou")) break;
            return;
        case 's':
            if (ends("ism")) break;
            return;
        case 't':
            if (ends("ate")) break;
            if (ends("iti")) break;
            return;
        case 'u':
            if (ends("ous")) break;
            return;
        case 'v':
            if (ends("ive")) break;
            return;
        case 'z':
            if (ends("ize")) break;
            return;
        default:
            return;
        }
        if (m() > 1)
            k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1)))
                --k_;
        }
        if (b_[static_cast<size_t>(k_)] == 'l' && double_cons(k_) && m() > 1)
            --k_;
    }
};

inline std::string porter_stem(std::string_view word) {
    return PorterStemmer{}.stem(to_lower(word));
}

} // namespace hintgen::detail

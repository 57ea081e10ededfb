// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include <cstring>
#include <string>

#include "seass/rouge.hpp"

namespace seass {

namespace {

// Porter, "An algorithm for suffix stripping", Program 14(3), 1980.
// b[0..k] is the live word; j marks the stem end while a suffix is tested.
class Stemmer {
 public:
  explicit Stemmer(const std::string& word) : b(word), k((int)word.size() - 1) {}

  std::string run() {
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b.substr(0, (size_t)k + 1);
  }

 private:
  std::string b;
  int k, j = 0;

  bool cons(int i) const {
    switch (b[(size_t)i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // number of consonant-vowel-consonant transitions in b[0..j]
  int m() const {
    int n = 0, i = 0;
    while (true) {
      if (i > j) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowelinstem() const {
    for (int i = 0; i <= j; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool doublec(int i) const { return i >= 1 && b[(size_t)i] == b[(size_t)i - 1] && cons(i); }

  // consonant-vowel-consonant ending at i, last consonant not w/x/y
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b[(size_t)i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(const char* s) {
    const int len = (int)std::strlen(s);
    if (len > k + 1) return false;
    if (b.compare((size_t)(k - len + 1), (size_t)len, s) != 0) return false;
    j = k - len;
    return true;
  }

  void setto(const char* s) {
    b.replace((size_t)j + 1, std::string::npos, s);
    k = j + (int)std::strlen(s);
  }

  void r(const char* s) {
    if (m() > 0) setto(s);
  }

  void step1ab() {
    if (b[(size_t)k] == 's') {
      if (ends("sses"))
        k -= 2;
      else if (ends("ies"))
        setto("i");
      else if (b[(size_t)k - 1] != 's')
        --k;
    }
    if (ends("eed")) {
      if (m() > 0) --k;
    } else if ((ends("ed") || ends("ing")) && vowelinstem()) {
      k = j;
      if (ends("at"))
        setto("ate");
      else if (ends("bl"))
        setto("ble");
      else if (ends("iz"))
        setto("ize");
      else if (doublec(k)) {
        --k;
        const char ch = b[(size_t)k];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k;
      } else if (m() == 1 && cvc(k)) {
        setto("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowelinstem()) b[(size_t)k] = 'i';
  }

  void step2() {
    static const char* const rules[][2] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"}};
    for (const auto& rule : rules)
      if (ends(rule[0])) {
        r(rule[1]);
        return;
      }
  }

  void step3() {
    static const char* const rules[][2] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"},
                                           {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""},
                                           {"ness", ""}};
    for (const auto& rule : rules)
      if (ends(rule[0])) {
        r(rule[1]);
        return;
      }
  }

  void step4() {
    static const char* const suffixes[] = {"al",  "ance", "ence", "er",  "ic",  "able",
                                           "ible", "ant",  "ement", "ment", "ent", "ion",
                                           "ou",  "ism",  "ate",  "iti", "ous", "ive", "ize"};
    for (const char* s : suffixes)
      if (ends(s)) {
        if (std::strcmp(s, "ion") == 0 && !(j >= 0 && (b[(size_t)j] == 's' || b[(size_t)j] == 't')))
          return;
        if (m() > 1) k = j;
        return;
      }
  }

  void step5() {
    j = k;
    if (b[(size_t)k] == 'e') {
      const int a = m();
      if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
    }
    if (b[(size_t)k] == 'l' && doublec(k) && m() > 1) --k;
  }
};

}  // namespace

std::string porter_stem(const std::string& token) {
  if (token.size() <= 2) return token;
  for (char c : token)
    if (c < 'a' || c > 'z') return token;
  return Stemmer(token).run();
}

}  // namespace seass

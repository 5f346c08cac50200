#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "fluentkb/error.hpp"

// Thin wrappers over ICU for normalization, case folding and word breaks.
namespace fluentkb::unicode {

inline std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::io_error, "ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::invalid_argument, "NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

/// NFC + full Unicode case folding. Diacritics are kept.
inline std::string fold(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.foldCase();
  std::string folded;
  s.toUTF8String(folded);
  return nfc(folded);
}

/// NFC + root-locale lowercase (no folding of sharp s and similar).
inline std::string lower(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return nfc(out);
}

inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

struct Segment {
  std::size_t start = 0;  // scalar index
  std::size_t end = 0;    // scalar index, exclusive
  std::string text;
};

namespace detail {

inline bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019; }

inline bool is_word_char(UChar32 c) { return u_isalnum(c) || u_hasBinaryProperty(c, UCHAR_ALPHABETIC); }

}  // namespace detail

/// Word segmentation: ICU word boundaries, keeping only segments that
/// contain a letter or digit, then splitting at apostrophes so that
/// "l'arbitraire" yields "l" and "arbitraire".
inline std::vector<Segment> words(std::string_view text) {
  std::vector<Segment> out;
  if (text.empty()) return out;
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  // UTF-16 index -> scalar index.
  std::vector<std::size_t> scalar_at(static_cast<std::size_t>(s.length()) + 1, 0);
  {
    std::size_t n = 0;
    for (int32_t i = 0; i < s.length(); ++i) {
      scalar_at[static_cast<std::size_t>(i)] = n;
      if (!U16_IS_TRAIL(s.charAt(i))) ++n;
      if (U16_IS_LEAD(s.charAt(i))) scalar_at[static_cast<std::size_t>(i)] = n - 1;
    }
    scalar_at[static_cast<std::size_t>(s.length())] = n;
  }

  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(
      icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw Error(ErrorCode::io_error, "ICU word break iterator unavailable");
  it->setText(s);

  auto emit = [&](int32_t b, int32_t e) {
    if (b >= e) return;
    bool any = false;
    for (int32_t i = b; i < e;) {
      UChar32 c = s.char32At(i);
      if (detail::is_word_char(c)) any = true;
      i += U16_LENGTH(c);
    }
    if (!any) return;
    Segment seg;
    seg.start = scalar_at[static_cast<std::size_t>(b)];
    seg.end = scalar_at[static_cast<std::size_t>(e)];
    s.tempSubStringBetween(b, e).toUTF8String(seg.text);
    out.push_back(std::move(seg));
  };

  int32_t start = it->first();
  for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    int32_t piece = start;
    for (int32_t i = start; i < end;) {
      UChar32 c = s.char32At(i);
      if (detail::is_apostrophe(c)) {
        emit(piece, i);
        piece = i + U16_LENGTH(c);
      }
      i += U16_LENGTH(c);
    }
    emit(piece, end);
  }
  return out;
}

}  // namespace fluentkb::unicode

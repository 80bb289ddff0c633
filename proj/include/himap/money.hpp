#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace himap {

/// Currency amount held as integer cents. Displayed in dollars.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money cents(std::int64_t c) { return Money{c}; }
  static constexpr Money dollars(std::int64_t d) { return Money{d * 100}; }

  /// Parses "474", "210.5", "1700.00", "$1,700" into exact cents. At most two
  /// fractional digits are accepted.
  static std::optional<Money> parse(std::string_view text);

  /// Rounds a dollar figure coming from JSON to the nearest cent.
  static Money from_dollars(double d);

  [[nodiscard]] constexpr std::int64_t in_cents() const { return cents_; }
  [[nodiscard]] double as_dollars() const { return static_cast<double>(cents_) / 100.0; }

  /// "$684.00"; negative amounts render as "-$5.00".
  [[nodiscard]] std::string str() const;
  /// "684.00" without the currency sign, used in CSV output.
  [[nodiscard]] std::string plain() const;

  constexpr Money& operator+=(Money o) { cents_ += o.cents_; return *this; }
  constexpr Money& operator-=(Money o) { cents_ -= o.cents_; return *this; }
  friend constexpr Money operator+(Money a, Money b) { return Money{a.cents_ + b.cents_}; }
  friend constexpr Money operator-(Money a, Money b) { return Money{a.cents_ - b.cents_}; }
  friend constexpr Money operator*(Money a, std::int64_t k) { return Money{a.cents_ * k}; }
  friend constexpr Money operator*(std::int64_t k, Money a) { return Money{a.cents_ * k}; }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t c) : cents_(c) {}
  std::int64_t cents_ = 0;
};

}  // namespace himap

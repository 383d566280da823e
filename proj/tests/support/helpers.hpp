#pragma once

#include <doctest.h>

#include <functional>
#include <memory>

#include "multiseg/error.hpp"
#include "multiseg/series.hpp"

namespace helpers {

/// Runs `fn` and returns the code of the multiseg::Error it throws.
inline multiseg::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const multiseg::Error& e) {
    return e.code();
  }
  FAIL("expected a multiseg::Error");
  return multiseg::ErrorCode::Io;
}

/// Deep copy of [from, to] as a standalone series (local index 1 = global from).
inline std::shared_ptr<const multiseg::TimeSeries> materialize(const multiseg::TimeSeries& s,
                                                              multiseg::IndexInterval iv) {
  const auto view = s.view(iv);
  const auto ts = view.timestamps();
  std::vector<multiseg::Dimension> dims;
  for (const auto& d : s.dimensions()) {
    multiseg::Dimension c;
    c.name = d.name;
    c.kind = d.kind;
    c.categories = d.categories;
    if (d.is_categorical()) {
      const auto codes = view.codes(d);
      c.codes.assign(codes.begin(), codes.end());
    } else {
      const auto values = view.values(d);
      c.values.assign(values.begin(), values.end());
    }
    dims.push_back(std::move(c));
  }
  return std::make_shared<const multiseg::TimeSeries>(std::vector<multiseg::Timestamp>(ts.begin(), ts.end()),
                                                      std::move(dims), s.source_name());
}

}  // namespace helpers

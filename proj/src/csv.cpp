/*
 * Copyright 2026 The bgan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bgan/csv.hpp"

#include <charconv>

#include "bgan/error.hpp"

namespace bgan {

std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
{
  if (!out_)
    throw Error("cannot open " + path + " for writing");
  for (const auto& h : header)
    cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& text)
{
  if (in_row_ > 0)
    out_ << ',';
  out_ << text;
  ++in_row_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row()
{
  if (in_row_ != columns_)
    throw ShapeError(path_ + ": row has " + std::to_string(in_row_) +
                     " cells, header has " + std::to_string(columns_));
  out_ << '\n';
  out_.flush();
  if (!out_)
    throw Error("write failed for " + path_);
  in_row_ = 0;
}

} // namespace bgan

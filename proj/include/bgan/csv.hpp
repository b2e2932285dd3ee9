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

#ifndef BGAN_CSV_HPP
#define BGAN_CSV_HPP

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace bgan {

// Shortest text that reads back to the same double.
std::string format_double(double v);

// Comma-separated, header row first, LF line endings.
class CsvWriter
{
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

} // namespace bgan

#endif // BGAN_CSV_HPP
